#pragma once

#include "mueller/common.hpp"
#include "mueller/polarization.hpp"
#include "mueller/mueller_h.hpp"
#include "mueller/cone.hpp"
#include "mueller/witness.hpp"
#include "mueller/io.hpp"
