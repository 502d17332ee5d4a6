// Copyright 2025 The pld-accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "pld/allocation.hpp"
#include "pld/compose.hpp"
#include "pld/discrete_pld.hpp"
#include "pld/discretize.hpp"
#include "pld/errors.hpp"
#include "pld/geometric.hpp"
#include "pld/hockey_stick.hpp"
#include "pld/kahan.hpp"
#include "pld/mechanisms.hpp"
#include "pld/normal.hpp"
#include "pld/oracle.hpp"
#include "pld/pipeline.hpp"
#include "pld/serialize.hpp"
#include "pld/source.hpp"
#include "pld/stoch_dom.hpp"
#include "pld/subsample.hpp"
#include "pld/types.hpp"
