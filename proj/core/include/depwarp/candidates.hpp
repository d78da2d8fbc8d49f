// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <string>
#include <vector>

#include "depwarp/span.hpp"

namespace depwarp {

// Ordered (caller, callee) service pair observed at least once in the corpus.
struct CandidatePair {
    std::string caller;
    std::string callee;

    friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
    friend auto operator<=>(const CandidatePair&, const CandidatePair&) = default;
};

using CandidateSet = std::vector<CandidatePair>;

// Distinct (parent service, service) pairs over spans with a resolved parent,
// sorted lexicographically by caller then callee. Self-pairs are kept; orphan
// and root spans contribute nothing. Requires augment_parent_names() first.
CandidateSet select_candidates(const SpanCorpus& corpus);

// One pair per line, caller<TAB>callee, in set order.
void write_candidates_tsv(const CandidateSet& pairs, const std::string& path);

}  // namespace depwarp
