// Copyright 2026 The corrqec Authors
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

#include "corrqec/bath.hpp"
#include "corrqec/binomial.hpp"
#include "corrqec/codes.hpp"
#include "corrqec/decoherence_pair.hpp"
#include "corrqec/dephasing.hpp"
#include "corrqec/errors.hpp"
#include "corrqec/oracle.hpp"
#include "corrqec/quadrature.hpp"
#include "corrqec/residual.hpp"
#include "corrqec/state.hpp"
