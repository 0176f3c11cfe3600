#pragma once

#include "gesture/annotations.hpp"
#include "gesture/classify.hpp"
#include "gesture/depth.hpp"
#include "gesture/depthio.hpp"
#include "gesture/error.hpp"
#include "gesture/eval.hpp"
#include "gesture/idmm.hpp"
#include "gesture/image.hpp"
#include "gesture/pipeline.hpp"
#include "gesture/qomseg.hpp"
#include "gesture/synth.hpp"
