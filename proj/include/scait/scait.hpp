// Umbrella header for the whole library.
#ifndef SCAIT_SCAIT_HPP
#define SCAIT_SCAIT_HPP

#include "scait/channel.hpp"
#include "scait/common.hpp"
#include "scait/config.hpp"
#include "scait/dataset.hpp"
#include "scait/harness.hpp"
#include "scait/image.hpp"
#include "scait/image_codec.hpp"
#include "scait/kb.hpp"
#include "scait/link.hpp"
#include "scait/nn.hpp"
#include "scait/rng.hpp"
#include "scait/semantic.hpp"
#include "scait/svg.hpp"
#include "scait/tensor.hpp"
#include "scait/wire.hpp"

#endif  // SCAIT_SCAIT_HPP
