#pragma once

#include <hgc/compiled.hpp>
#include <hgc/core.hpp>
#include <hgc/faultsim.hpp>
#include <hgc/ilp.hpp>
#include <hgc/io.hpp>
#include <hgc/pipeline.hpp>
#include <hgc/range.hpp>
#include <hgc/table.hpp>
