#pragma once

#include "rouge_we/aesop.hpp"
#include "rouge_we/correlation.hpp"
#include "rouge_we/embeddings.hpp"
#include "rouge_we/metric_config.hpp"
#include "rouge_we/rouge.hpp"
#include "rouge_we/text.hpp"
