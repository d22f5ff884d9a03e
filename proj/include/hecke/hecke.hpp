#pragma once

#include "hecke/integer.hpp"
#include "hecke/matrix.hpp"
#include "hecke/normal_form.hpp"
#include "hecke/hecke_element.hpp"
#include "hecke/coset_system.hpp"
#include "hecke/ring.hpp"
#include "hecke/json.hpp"
#include "hecke/gl.hpp"
#include "hecke/heisenberg.hpp"
#include "hecke/global.hpp"
#include "hecke/global_heisenberg.hpp"
#include "hecke/document.hpp"
