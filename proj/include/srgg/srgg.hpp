#pragma once

#include "srgg/asymptotics.hpp"
#include "srgg/cantor.hpp"
#include "srgg/connect.hpp"
#include "srgg/entropy.hpp"
#include "srgg/errors.hpp"
#include "srgg/geometry.hpp"
#include "srgg/io.hpp"
#include "srgg/mass.hpp"
#include "srgg/parallel.hpp"
#include "srgg/random.hpp"
#include "srgg/specfun.hpp"
#include "srgg/validation.hpp"
