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

#include <atomic>
#include <cstdlib>
#include <string>

#include "segcert/errors.hpp"
#include "segcert/kernels.hpp"

namespace segcert::kernels {
namespace {

std::atomic<const KernelTable*> forced{nullptr};

const KernelTable& table_for(Isa isa) {
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::avx2) return avx2_table();
#endif
  return scalar_table();
}

const KernelTable& detect() {
  if (const char* env = std::getenv("SEGCERT_ISA")) {
    const std::string want(env);
    if (want == "scalar") return scalar_table();
    if (want == "avx2" && isa_supported(Isa::avx2)) return table_for(Isa::avx2);
  }
  return isa_supported(Isa::avx2) ? table_for(Isa::avx2) : scalar_table();
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& active() {
  if (const KernelTable* t = forced.load(std::memory_order_acquire)) return *t;
  static const KernelTable& detected = detect();
  return detected;
}

void force_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw DomainError("instruction set not supported here: " + std::string(isa_name(isa)));
  }
  forced.store(&table_for(isa), std::memory_order_release);
}

void reset_isa() { forced.store(nullptr, std::memory_order_release); }

}  // namespace segcert::kernels
