// Copyright 2026 The CSM Authors. All Rights Reserved.
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

#include "csm/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

namespace csm {
namespace {

std::mutex& PlannerMutex() {
  static std::mutex mutex;
  return mutex;
}

}  // namespace

RealFft::RealFft(size_t size) : size_(size) {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  real_ = fftw_alloc_real(size_);
  auto* spectrum = fftw_alloc_complex(bins());
  spectrum_ = spectrum;
  forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(size_), real_, spectrum,
                                  FFTW_ESTIMATE);
  inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(size_), spectrum, real_,
                                  FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_));
  fftw_free(real_);
  fftw_free(spectrum_);
}

void RealFft::Forward(std::span<const double> in,
                      std::span<std::complex<double>> out) {
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(static_cast<fftw_plan>(forward_));
  std::memcpy(out.data(), spectrum_, bins() * sizeof(fftw_complex));
}

void RealFft::Inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) {
  // c2r destroys its input, so work on the owned buffer.
  std::memcpy(spectrum_, in.data(), bins() * sizeof(fftw_complex));
  fftw_execute(static_cast<fftw_plan>(inverse_));
  std::copy(real_, real_ + size_, out.begin());
}

size_t FastFftSize(size_t n) {
  if (n <= 1) return 1;
  size_t best = 1;
  while (best < n) best <<= 1;
  for (size_t p5 = 1; p5 < best; p5 *= 5) {
    for (size_t p35 = p5; p35 < best; p35 *= 3) {
      size_t candidate = p35;
      while (candidate < n) candidate <<= 1;
      best = std::min(best, candidate);
    }
  }
  return best;
}

}  // namespace csm
