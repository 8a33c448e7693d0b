#ifndef UIC_UIC_HPP
#define UIC_UIC_HPP

#include "container.hpp"
#include "error.hpp"
#include "huffman.hpp"
#include "image.hpp"
#include "klt.hpp"
#include "metrics.hpp"
#include "pipeline.hpp"
#include "plane.hpp"
#include "quantizer.hpp"
#include "scan.hpp"
#include "wavelet.hpp"

#endif // UIC_UIC_HPP
