#pragma once

#include <string>
#include <vector>

namespace hsed::metrics {

// Hard-assignment partition similarity scores. Natural logs throughout;
// NMI (and the normalizer inside AMI) use the arithmetic mean of entropies.

double accuracy(const std::vector<int>& truth, const std::vector<int>& predicted);
double nmi(const std::vector<int>& truth, const std::vector<int>& predicted);
double ami(const std::vector<int>& truth, const std::vector<int>& predicted);
double ari(const std::vector<int>& truth, const std::vector<int>& predicted);
double micro_f1(const std::vector<int>& truth, const std::vector<int>& predicted);
double macro_f1(const std::vector<int>& truth, const std::vector<int>& predicted);

struct EvalReport {
  double acc = 0.0;
  double nmi = 0.0;
  double ami = 0.0;
  double ari = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double wall_seconds = 0.0;
};

EvalReport evaluate(const std::vector<int>& truth, const std::vector<int>& predicted);

// Flat key-value block, one metric per line, 6 decimal places.
// Wall time is deliberately not part of the block so reruns diff clean.
std::string format_report(const EvalReport& r);

}  // namespace hsed::metrics
