#pragma once

#include "cmx/augment.hpp"
#include "cmx/corpus.hpp"
#include "cmx/error.hpp"
#include "cmx/lang_tag.hpp"
#include "cmx/lid.hpp"
#include "cmx/parallel.hpp"
#include "cmx/quantify.hpp"
#include "cmx/record.hpp"
#include "cmx/rng.hpp"
#include "cmx/sample.hpp"
#include "cmx/unicode.hpp"
