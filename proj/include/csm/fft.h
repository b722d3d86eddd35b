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

#ifndef CSM_FFT_H_
#define CSM_FFT_H_

#include <complex>
#include <cstddef>
#include <span>

namespace csm {

// Owns an FFTW r2c/c2r plan pair of a fixed size. Plan creation is
// serialized internally; Forward/Inverse on distinct instances may run
// concurrently.
class RealFft {
 public:
  explicit RealFft(size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  size_t size() const { return size_; }
  size_t bins() const { return size_ / 2 + 1; }

  // in.size() == size(), out.size() == bins(). Unnormalized.
  void Forward(std::span<const double> in, std::span<std::complex<double>> out);
  // in.size() == bins(), out.size() == size(). Unnormalized (scaled by size).
  void Inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  size_t size_;
  double* real_ = nullptr;
  void* spectrum_ = nullptr;
  void* forward_ = nullptr;
  void* inverse_ = nullptr;
};

// Smallest 2^a 3^b 5^c not below n.
size_t FastFftSize(size_t n);

}  // namespace csm

#endif  // CSM_FFT_H_
