#pragma once

#include "toptree/alpha.hpp"
#include "toptree/audit.hpp"
#include "toptree/builder.hpp"
#include "toptree/generators.hpp"
#include "toptree/top_dag.hpp"
#include "toptree/top_tree.hpp"
#include "toptree/tree.hpp"
