#pragma once

#include "itemaudit/common.hpp"
#include "itemaudit/corpus.hpp"
#include "itemaudit/preprocess.hpp"
#include "itemaudit/vectorize.hpp"
#include "itemaudit/cluster.hpp"
#include "itemaudit/classify.hpp"
#include "itemaudit/topics.hpp"
#include "itemaudit/ner.hpp"
#include "itemaudit/analysis.hpp"
#include "itemaudit/serialize.hpp"
#include "itemaudit/report.hpp"
#include "itemaudit/pipeline.hpp"
#include "itemaudit/synth_spec.hpp"
