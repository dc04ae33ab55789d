#ifndef AUTOMORPH_AUTOMORPH_HPP
#define AUTOMORPH_AUTOMORPH_HPP

#include "automorph/error.hpp"
#include "automorph/circle_map.hpp"
#include "automorph/continued_fraction.hpp"
#include "automorph/rotation.hpp"
#include "automorph/grid_measure.hpp"
#include "automorph/transfer.hpp"
#include "automorph/s_measure.hpp"
#include "automorph/measure_io.hpp"
#include "automorph/tongue.hpp"

#endif  // AUTOMORPH_AUTOMORPH_HPP
