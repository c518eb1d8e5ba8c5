// Copyright 2026 The segcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "segcert/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "segcert/errors.hpp"

namespace segcert::metrics {
namespace {

// Fixed-format decimal so the same numbers always produce the same bytes.
std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

EvalReport evaluate(const LabelMap& pred, const LabelMap& gt, int classes, double radius) {
  if (classes < 1) throw DomainError("evaluate: classes must be positive");
  if (!pred.same_shape(gt) || gt.size() == 0) throw DomainError("evaluate: prediction and ground truth shapes differ");

  const auto k = static_cast<std::size_t>(classes);
  std::vector<std::size_t> tp(k, 0), fp(k, 0), fn(k, 0);
  std::size_t correct = 0;
  std::size_t abstained = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const Label g = gt[i];
    const Label p = pred[i];
    if (g >= classes) throw DomainError("evaluate: ground truth label outside [0, K)");
    if (p == kAbstain) {
      ++abstained;
      ++fn[g];
      continue;
    }
    if (p >= classes) throw DomainError("evaluate: predicted label outside [0, K)");
    if (p == g) {
      ++correct;
      ++tp[g];
    } else {
      ++fp[p];
      ++fn[g];
    }
  }

  EvalReport r;
  const auto total = static_cast<double>(gt.size());
  r.acc_strict = correct / total;
  r.abstain_rate = abstained / total;
  const std::size_t answered = gt.size() - abstained;
  r.acc_nonabstain = answered == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(answered);
  r.radius = radius;
  r.per_class_iou.assign(k, std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  int counted = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t uni = tp[c] + fp[c] + fn[c];
    if (uni == 0) continue;
    r.per_class_iou[c] = static_cast<double>(tp[c]) / static_cast<double>(uni);
    sum += r.per_class_iou[c];
    ++counted;
  }
  r.miou = counted == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / counted;
  return r;
}

std::string csv_header() {
  return "sigma,radius,acc_strict,acc_nonabstain,miou,abstain_rate,n,n0,alpha,tau,denoise_mode,model,seed";
}

std::string csv_line(const CsvRow& row) {
  const EvalReport& e = row.report;
  std::string out;
  out += general(row.sigma) + ',';
  out += number(e.radius) + ',';
  out += number(e.acc_strict) + ',';
  out += number(e.acc_nonabstain) + ',';
  out += number(e.miou) + ',';
  out += number(e.abstain_rate) + ',';
  out += std::to_string(row.n) + ',';
  out += std::to_string(row.n0) + ',';
  out += general(row.alpha) + ',';
  out += general(row.tau) + ',';
  out += row.denoise_mode + ',';
  out += row.model + ',';
  out += std::to_string(row.seed);
  return out;
}

}  // namespace segcert::metrics
