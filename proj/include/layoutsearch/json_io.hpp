#pragma once

#include <string>

#include "json.hpp"

#include "layoutsearch/eval.hpp"
#include "layoutsearch/index.hpp"
#include "layoutsearch/layout_graph.hpp"
#include "layoutsearch/query.hpp"

namespace layoutsearch {

using Json = nlohmann::ordered_json;

// Integral values are written as JSON integers so output is stable across
// round-trips.
Json number_json(double v);

Json rect_json(const Rect& r);

Json graph_to_json(const LayoutGraph& graph);
Json document_to_json(const Document& doc);
// Throws InvalidInput on schema violations.
Document document_from_json(const Json& j);

// Block-annotation format shared by `ingest` output and pre-segmented input:
// {doc_id, page:{w,h}, ach_doc, blocks:[{x,y,w,h,kind,ach_block}], lines:[{y,x0,x1}]}
Json annotation_to_json(const PageAnnotation& page);
PageAnnotation annotation_from_json(const Json& j);

// Ranked response shared by the CLI and the HTTP service:
// {query_types:{name:type}, results:[{doc_id, score, matches:[{layout, hypothesis,
//  score, bbox, mapping:[{query_block, dummy, doc_blocks:[{id,x,y,w,h,kind}]}]}]}]}
Json results_json(const CorpusStore& store, const BooleanQuery& q, const std::vector<DocumentHit>& hits);

// Single-layout query document: {canvas, layouts:{name:{blocks}}, expr:name}.
Json layout_query_json(const std::string& name, const QueryLayout& layout);

Json truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const Json& j);

// Table-1 style rows: type, queries, documents retrieved, relevant, hits,
// recall, precision, mean time.
Json report_json(const EvalReport& report);

std::string dump(const Json& j, int indent = -1);

}  // namespace layoutsearch
