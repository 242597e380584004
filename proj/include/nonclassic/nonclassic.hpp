#pragma once

#include "nonclassic/closed_forms.hpp"
#include "nonclassic/combinatorics.hpp"
#include "nonclassic/criteria.hpp"
#include "nonclassic/error.hpp"
#include "nonclassic/evolution.hpp"
#include "nonclassic/fock.hpp"
#include "nonclassic/process.hpp"
