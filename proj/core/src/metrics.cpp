#include "hsed/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hsed::metrics {

namespace {

void check_pair(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size())
    throw std::invalid_argument("metrics: label vectors differ in length");
  if (truth.empty()) throw std::invalid_argument("metrics: empty label vectors");
  for (int v : truth)
    if (v < 0) throw std::invalid_argument("metrics: negative class id");
  for (int v : predicted)
    if (v < 0) throw std::invalid_argument("metrics: negative class id");
}

struct Contingency {
  std::vector<std::vector<long>> n;  // clusters(truth) x clusters(predicted)
  std::vector<long> a, b;            // margins
  long total = 0;
};

Contingency contingency(const std::vector<int>& truth, const std::vector<int>& predicted) {
  std::map<int, int> tu, pu;
  for (int v : truth) tu.emplace(v, int(tu.size()));
  for (int v : predicted) pu.emplace(v, int(pu.size()));
  Contingency c;
  c.n.assign(tu.size(), std::vector<long>(pu.size(), 0));
  for (std::size_t i = 0; i < truth.size(); ++i)
    ++c.n[tu[truth[i]]][pu[predicted[i]]];
  c.a.assign(tu.size(), 0);
  c.b.assign(pu.size(), 0);
  for (std::size_t i = 0; i < c.n.size(); ++i)
    for (std::size_t j = 0; j < c.n[i].size(); ++j) {
      c.a[i] += c.n[i][j];
      c.b[j] += c.n[i][j];
      c.total += c.n[i][j];
    }
  return c;
}

double entropy(const std::vector<long>& margins, long n) {
  double h = 0.0;
  for (long m : margins)
    if (m > 0) h -= double(m) / n * std::log(double(m) / n);
  return h;
}

double mutual_information(const Contingency& c) {
  double mi = 0.0;
  const double n = double(c.total);
  for (std::size_t i = 0; i < c.n.size(); ++i)
    for (std::size_t j = 0; j < c.n[i].size(); ++j) {
      const long nij = c.n[i][j];
      if (nij > 0)
        mi += nij / n * std::log(n * nij / (double(c.a[i]) * c.b[j]));
    }
  return std::max(mi, 0.0);
}

// E[MI] under the hypergeometric permutation model with fixed margins.
double expected_mi(const Contingency& c) {
  const long n = c.total;
  const double lg_n = std::lgamma(double(n) + 1.0);
  double emi = 0.0;
  for (long ai : c.a)
    for (long bj : c.b) {
      const long lo = std::max(1L, ai + bj - n);
      const long hi = std::min(ai, bj);
      for (long nij = lo; nij <= hi; ++nij) {
        const double term = double(nij) / n *
                            std::log(double(n) * nij / (double(ai) * bj));
        const double lp = std::lgamma(double(ai) + 1.0) + std::lgamma(double(bj) + 1.0) +
                          std::lgamma(double(n - ai) + 1.0) + std::lgamma(double(n - bj) + 1.0) -
                          lg_n - std::lgamma(double(nij) + 1.0) -
                          std::lgamma(double(ai - nij) + 1.0) -
                          std::lgamma(double(bj - nij) + 1.0) -
                          std::lgamma(double(n - ai - bj + nij) + 1.0);
        emi += term * std::exp(lp);
      }
    }
  return emi;
}

bool same_partition(const Contingency& c) {
  // Identical as partitions: every truth cluster maps to exactly one predicted
  // cluster and vice versa.
  for (const auto& row : c.n) {
    int nz = 0;
    for (long v : row) nz += v > 0;
    if (nz != 1) return false;
  }
  for (std::size_t j = 0; j < c.b.size(); ++j) {
    int nz = 0;
    for (const auto& row : c.n) nz += row[j] > 0;
    if (nz != 1) return false;
  }
  return true;
}

long choose2(long m) { return m * (m - 1) / 2; }

}  // namespace

double accuracy(const std::vector<int>& truth, const std::vector<int>& predicted) {
  check_pair(truth, predicted);
  long hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i];
  return double(hits) / double(truth.size());
}

double nmi(const std::vector<int>& truth, const std::vector<int>& predicted) {
  check_pair(truth, predicted);
  const Contingency c = contingency(truth, predicted);
  const double hu = entropy(c.a, c.total), hv = entropy(c.b, c.total);
  if (hu == 0.0 && hv == 0.0) return 1.0;  // two single-cluster partitions
  const double mean_h = 0.5 * (hu + hv);
  if (mean_h == 0.0) return 0.0;
  return mutual_information(c) / mean_h;
}

double ami(const std::vector<int>& truth, const std::vector<int>& predicted) {
  check_pair(truth, predicted);
  const Contingency c = contingency(truth, predicted);
  const double hu = entropy(c.a, c.total), hv = entropy(c.b, c.total);
  if (hu == 0.0 && hv == 0.0) return same_partition(c) ? 1.0 : 0.0;
  const double mi = mutual_information(c);
  const double emi = expected_mi(c);
  const double den = 0.5 * (hu + hv) - emi;
  if (std::abs(den) < 1e-15) return same_partition(c) ? 1.0 : 0.0;
  return (mi - emi) / den;
}

double ari(const std::vector<int>& truth, const std::vector<int>& predicted) {
  check_pair(truth, predicted);
  if (truth.size() < 2) throw std::invalid_argument("ari: need at least 2 elements");
  const Contingency c = contingency(truth, predicted);
  long index = 0;
  for (const auto& row : c.n)
    for (long v : row) index += choose2(v);
  long sum_a = 0, sum_b = 0;
  for (long m : c.a) sum_a += choose2(m);
  for (long m : c.b) sum_b += choose2(m);
  const long pairs = choose2(c.total);
  // Scale the usual (index - E)/(max - E) by 2*pairs so both sides stay
  // integral; exact rationals like -1/2 then come out exactly in doubles.
  using wide = __int128;
  const wide num = 2 * (wide(index) * pairs - wide(sum_a) * sum_b);
  const wide den = wide(pairs) * (sum_a + sum_b) - 2 * wide(sum_a) * sum_b;
  if (den == 0) return 1.0;  // degenerate margins, identical by construction
  return double(static_cast<long double>(num) / static_cast<long double>(den));
}

namespace {

struct F1Counts {
  std::map<int, long> tp, fp, fn;
};

F1Counts f1_counts(const std::vector<int>& truth, const std::vector<int>& predicted) {
  F1Counts c;
  std::set<int> classes(truth.begin(), truth.end());
  classes.insert(predicted.begin(), predicted.end());
  for (int cls : classes) c.tp[cls] = c.fp[cls] = c.fn[cls] = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == predicted[i]) {
      ++c.tp[truth[i]];
    } else {
      ++c.fp[predicted[i]];
      ++c.fn[truth[i]];
    }
  }
  return c;
}

}  // namespace

double micro_f1(const std::vector<int>& truth, const std::vector<int>& predicted) {
  check_pair(truth, predicted);
  const F1Counts c = f1_counts(truth, predicted);
  long tp = 0, fp = 0, fn = 0;
  for (const auto& [cls, v] : c.tp) {
    tp += v;
    fp += c.fp.at(cls);
    fn += c.fn.at(cls);
  }
  const double den = 2.0 * tp + fp + fn;
  return den == 0.0 ? 0.0 : 2.0 * tp / den;
}

double macro_f1(const std::vector<int>& truth, const std::vector<int>& predicted) {
  check_pair(truth, predicted);
  const F1Counts c = f1_counts(truth, predicted);
  double sum = 0.0;
  for (const auto& [cls, tp] : c.tp) {
    const double den = 2.0 * tp + c.fp.at(cls) + c.fn.at(cls);
    sum += den == 0.0 ? 0.0 : 2.0 * tp / den;
  }
  return sum / double(c.tp.size());
}

EvalReport evaluate(const std::vector<int>& truth, const std::vector<int>& predicted) {
  EvalReport r;
  r.acc = accuracy(truth, predicted);
  r.nmi = nmi(truth, predicted);
  r.ami = ami(truth, predicted);
  r.ari = truth.size() >= 2 ? ari(truth, predicted) : 1.0;
  r.micro_f1 = micro_f1(truth, predicted);
  r.macro_f1 = macro_f1(truth, predicted);
  return r;
}

std::string format_report(const EvalReport& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << "acc " << r.acc << "\n"
     << "nmi " << r.nmi << "\n"
     << "ami " << r.ami << "\n"
     << "ari " << r.ari << "\n"
     << "micro_f1 " << r.micro_f1 << "\n"
     << "macro_f1 " << r.macro_f1 << "\n";
  return os.str();
}

}  // namespace hsed::metrics
