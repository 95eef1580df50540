// Copyright 2026 The ftcal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FTCAL__FTCAL_HPP_
#define FTCAL__FTCAL_HPP_

#include "ftcal/calibrate.hpp"
#include "ftcal/errors.hpp"
#include "ftcal/io.hpp"
#include "ftcal/model.hpp"
#include "ftcal/offset.hpp"
#include "ftcal/solver.hpp"
#include "ftcal/synth.hpp"
#include "ftcal/validate.hpp"

#endif  // FTCAL__FTCAL_HPP_
