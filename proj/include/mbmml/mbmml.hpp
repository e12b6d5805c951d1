#ifndef MBMML_MBMML_HPP
#define MBMML_MBMML_HPP

#include "mbmml/common.hpp"
#include "mbmml/core.hpp"
#include "mbmml/eval.hpp"
#include "mbmml/iamb.hpp"
#include "mbmml/io.hpp"
#include "mbmml/mml.hpp"
#include "mbmml/polytree.hpp"
#include "mbmml/search.hpp"
#include "mbmml/synth.hpp"

#endif
