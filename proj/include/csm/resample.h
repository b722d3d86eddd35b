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

#ifndef CSM_RESAMPLE_H_
#define CSM_RESAMPLE_H_

#include <span>
#include <vector>

namespace csm {

// Band-limited resampling with a Kaiser-windowed sinc kernel (beta 8.6,
// 32 zero crossings per side at the narrower of the two Nyquist rates).
std::vector<float> Resample(std::span<const float> input, int from_rate,
                            int to_rate);

}  // namespace csm

#endif  // CSM_RESAMPLE_H_
