#pragma once

#include "spherespec/decay.hpp"
#include "spherespec/errors.hpp"
#include "spherespec/harmonics.hpp"
#include "spherespec/kernel_grammar.hpp"
#include "spherespec/kernels.hpp"
#include "spherespec/oracle.hpp"
#include "spherespec/real.hpp"
#include "spherespec/serialize.hpp"
#include "spherespec/spectra.hpp"
