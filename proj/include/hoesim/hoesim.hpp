#pragma once

// Umbrella header for the whole library.

#include "hoesim/config.hpp"
#include "hoesim/errors.hpp"
#include "hoesim/fft.hpp"
#include "hoesim/field.hpp"
#include "hoesim/grating.hpp"
#include "hoesim/hoe.hpp"
#include "hoesim/io.hpp"
#include "hoesim/paraxial.hpp"
#include "hoesim/pipeline.hpp"
#include "hoesim/propagation.hpp"
#include "hoesim/sampling.hpp"
#include "hoesim/scene.hpp"
#include "hoesim/units.hpp"
