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

#ifndef EVTMAP_ERRORS_HPP
#define EVTMAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace evtmap {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid scenario, request or command-line configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of an operation (e.g. SNR <= 0).
class DomainError : public Error {
public:
    using Error::Error;
};

// Not enough data to resolve the requested statistic (too few samples,
// no exceedances above the threshold).
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// The benchmark quantile needs floor(N * zeta) >= 1.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

// Factorization or optimizer failure.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Target phi lies below the fitted threshold: the outage is <= 1 - rho but
// the tail model does not resolve it.
class OutsideTailError : public Error {
public:
    using Error::Error;
};

// Requested outage zeta is larger than the tail fraction 1 - rho.
class TargetTooLooseError : public Error {
public:
    using Error::Error;
};

// Inputs of a consuming stage do not match the dataset they claim to be from.
class IntegrityError : public Error {
public:
    using Error::Error;
};

} // namespace evtmap

#endif
