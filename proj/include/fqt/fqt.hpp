#pragma once

#include "fqt/approx.hpp"
#include "fqt/currents.hpp"
#include "fqt/error.hpp"
#include "fqt/floquet.hpp"
#include "fqt/lindblad.hpp"
#include "fqt/model.hpp"
#include "fqt/version.hpp"
