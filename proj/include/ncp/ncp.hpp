#pragma once

#include "algebra.hpp"
#include "channels.hpp"
#include "covariance.hpp"
#include "errors.hpp"
#include "gns.hpp"
#include "linalg.hpp"
#include "models.hpp"
#include "states.hpp"
