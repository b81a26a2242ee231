#pragma once

#include "boxlab/errors.hpp"
#include "boxlab/tensorcore.hpp"
#include "boxlab/boxes.hpp"
#include "boxlab/lhv.hpp"
#include "boxlab/dilation.hpp"
#include "boxlab/protocol.hpp"
#include "boxlab/tsirelson.hpp"
#include "boxlab/seesaw.hpp"
#include "boxlab/io.hpp"
