#pragma once

#include "error.hpp"
#include "upset.hpp"
#include "family.hpp"
#include "upmap.hpp"
#include "ultrafilter.hpp"
#include "ultraproduct.hpp"
#include "text.hpp"
#include "random.hpp"
#include "report.hpp"
#include "coherence.hpp"
#include "finite_space.hpp"
#include "finite_category.hpp"
#include "vult.hpp"
#include "ultrasheaf.hpp"
#include "descent.hpp"
