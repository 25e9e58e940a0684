#pragma once

#include <string>

#include "layoutsearch/layout_graph.hpp"
#include "layoutsearch/raster.hpp"

namespace layoutsearch {

// Full raster pipeline: binarize, strip rulings, classify components, form
// blocks. Horizontal rulings are kept as separators for symmetry merging.
// Throws NoTextContent when the page has no text components.
PageAnnotation ingest_image(const GrayImage& img, std::string doc_id, const ArlsaParams& params = {});

}  // namespace layoutsearch
