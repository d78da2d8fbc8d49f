// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "depwarp/candidates.hpp"

#include <set>

#include "depwarp/errors.hpp"
#include "internal_util.hpp"

namespace depwarp {

CandidateSet select_candidates(const SpanCorpus& corpus) {
    std::set<CandidatePair> pairs;
    for (const Span& s : corpus.spans) {
        if (!s.parent_service_name) continue;
        pairs.insert({*s.parent_service_name, s.service_name});
    }
    return {pairs.begin(), pairs.end()};
}

void write_candidates_tsv(const CandidateSet& pairs, const std::string& path) {
    auto out = detail::open_out(path);
    out << "caller\tcallee\n";
    for (const CandidatePair& p : pairs) {
        detail::require_plain_token(p.caller, "caller");
        detail::require_plain_token(p.callee, "callee");
        out << p.caller << '\t' << p.callee << '\n';
    }
    if (!out) throw IoError("write failure on " + path);
}

}  // namespace depwarp
