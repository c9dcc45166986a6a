#ifndef JORDAN_JORDAN_HPP
#define JORDAN_JORDAN_HPP

#include "jordan/error.hpp"
#include "jordan/linalg.hpp"
#include "jordan/algebra.hpp"
#include "jordan/catalog.hpp"
#include "jordan/fd.hpp"
#include "jordan/geometry.hpp"
#include "jordan/surface.hpp"
#include "jordan/spec_io.hpp"

#endif  // JORDAN_JORDAN_HPP
