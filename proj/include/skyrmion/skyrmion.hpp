#pragma once

#include "skyrmion/bp_fit.hpp"
#include "skyrmion/bp_profiles.hpp"
#include "skyrmion/csv.hpp"
#include "skyrmion/field.hpp"
#include "skyrmion/field_energy.hpp"
#include "skyrmion/minimizer.hpp"
#include "skyrmion/parallel.hpp"
#include "skyrmion/reduced_energy.hpp"
#include "skyrmion/sfld_io.hpp"
#include "skyrmion/specfun.hpp"
#include "skyrmion/spectral_gap.hpp"
#include "skyrmion/stray_field.hpp"
