/*
 * Copyright 2026 The precoder-sim Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Convenience header pulling in the whole library.

#include "precoder/config.hpp"
#include "precoder/error.hpp"
#include "precoder/fixed_complex.hpp"
#include "precoder/fronthaul.hpp"
#include "precoder/generator.hpp"
#include "precoder/golden.hpp"
#include "precoder/matrix_multiplier.hpp"
#include "precoder/precoder_memory.hpp"
#include "precoder/precoding_matrix.hpp"
#include "precoder/rx_converter.hpp"
#include "precoder/scenario.hpp"
#include "precoder/simulator.hpp"
#include "precoder/timing_model.hpp"
