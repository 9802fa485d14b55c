// SPDX-License-Identifier: Apache-2.0
//
// evtmap - extreme-value radio maps for outage-constrained rate selection
// Copyright (C) 2026 The evtmap authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef EVTMAP_SPECIAL_HPP
#define EVTMAP_SPECIAL_HPP

namespace evtmap {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile, p in (0, 1). Wichura's AS241 rational
// approximation followed by one Newton step on the CDF.
double inverse_normal_cdf(double p);

// Inverse error function, y in (-1, 1).
double inverse_erf(double y);

} // namespace evtmap

#endif
