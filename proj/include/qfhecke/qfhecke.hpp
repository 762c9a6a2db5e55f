#pragma once

#include "qfhecke/arith.hpp"
#include "qfhecke/bounds.hpp"
#include "qfhecke/classgroup.hpp"
#include "qfhecke/equidist.hpp"
#include "qfhecke/error.hpp"
#include "qfhecke/heckealg.hpp"
#include "qfhecke/io.hpp"
#include "qfhecke/kloosterman.hpp"
#include "qfhecke/measures.hpp"
#include "qfhecke/numberfield.hpp"
