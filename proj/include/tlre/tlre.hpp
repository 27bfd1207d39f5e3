#pragma once

#include "tlre/ablation.hpp"
#include "tlre/adam.hpp"
#include "tlre/checkpoint.hpp"
#include "tlre/config.hpp"
#include "tlre/corpus.hpp"
#include "tlre/embeddings.hpp"
#include "tlre/eval.hpp"
#include "tlre/gradcheck.hpp"
#include "tlre/lstm.hpp"
#include "tlre/model.hpp"
#include "tlre/ops.hpp"
#include "tlre/params.hpp"
#include "tlre/transfer.hpp"
