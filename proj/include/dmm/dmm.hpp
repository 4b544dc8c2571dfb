// SPDX-License-Identifier: Apache-2.0

#ifndef DMM_DMM_HPP
#define DMM_DMM_HPP

#include "combine.hpp"
#include "dsl.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "network.hpp"
#include "ports.hpp"
#include "random.hpp"
#include "stream.hpp"
#include "transforms.hpp"

#endif // DMM_DMM_HPP
