#include "layoutsearch/ingest.hpp"

namespace layoutsearch {

PageAnnotation ingest_image(const GrayImage& img, std::string doc_id, const ArlsaParams& params) {
  const Binarization bin = binarize_otsu(img);
  const auto rulings = detect_rulings(bin.image);
  const BinaryImage clean = remove_rulings(bin.image, rulings);
  const auto comps = classify_text_nontext(clean);

  PageAnnotation page;
  page.doc_id = std::move(doc_id);
  page.page = {static_cast<double>(img.width), static_cast<double>(img.height)};
  page.avg_char_height_doc = avg_char_height(comps);
  page.blocks = arlsa_blocks(clean, comps, params);
  for (const auto& r : rulings) {
    if (r.orientation == Orientation::Horizontal) page.lines.push_back({r.span.cy(), r.span.x, r.span.right()});
  }
  return page;
}

}  // namespace layoutsearch
