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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segcert/image.hpp"

namespace segcert::metrics {

/// Certified-segmentation scores. Abstentions count as errors in acc_strict
/// and as false negatives of their ground-truth class in the IoUs.
struct EvalReport {
  double acc_strict = 0.0;
  double acc_nonabstain = 0.0;  // 0 when every pixel abstains
  double miou = 0.0;            // NaN when no class occurs in pred or gt
  double abstain_rate = 0.0;
  double radius = 0.0;
  std::vector<double> per_class_iou;  // NaN for classes absent from both maps
};

/// gt must hold labels in [0, K); pred may also hold kAbstain.
EvalReport evaluate(const LabelMap& pred, const LabelMap& gt, int classes, double radius = 0.0);

/// One CSV row's worth of run metadata next to an EvalReport.
struct CsvRow {
  double sigma = 0.0;
  EvalReport report;
  int n = 0;
  int n0 = 0;
  double alpha = 0.0;
  double tau = 0.0;
  std::string denoise_mode;
  std::string model;
  std::uint64_t seed = 0;
};

/// sigma,radius,acc_strict,acc_nonabstain,miou,abstain_rate,n,n0,alpha,tau,denoise_mode,model,seed
std::string csv_header();
std::string csv_line(const CsvRow& row);

}  // namespace segcert::metrics
