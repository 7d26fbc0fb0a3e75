#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "unplab/adversary.hpp"
#include "unplab/entropy.hpp"
#include "unplab/extractors.hpp"
#include "unplab/guessing.hpp"
#include "unplab/leakage.hpp"
#include "unplab/protocols.hpp"
#include "unplab/qcore.hpp"

namespace unplab {

using json = nlohmann::json;

// Doubles are written in shortest round-trip form, so decode(encode(x))
// reproduces every bit. Non-finite values are written as the strings
// "inf", "-inf" and "nan".
json encode_number(double v);
double decode_number(const json& j);

json encode(const Matrix& m);  // {"re": [[...]], "im": [[...]]}
Matrix decode_matrix(const json& j);

json encode(const DensityOperator& rho);  // {"dims", "re", "im"}
DensityOperator decode_state(const json& j);

// {"bits", "probs": {"0": p, ...}, "conditionals": {"0": state, ...}}
json encode(const CqState& state);
CqState decode_cq(const json& j);

json encode(const WeakDesign& design);  // {"t", "r", "d", "sets"}
WeakDesign decode_design(const json& j);

json encode(const KrausChannel& chan);  // {"in_dims", "out_dims", "ops"}
KrausChannel decode_kraus(const json& j);

json encode(const LeakageChannel& chan);
LeakageChannel decode_leakage(const json& j);

// Families are named by descriptor: "unbounded", "constants", "budget:s",
// "enumerate:q:g". "budget:s" adds the basis measurement and, when the side
// register is at most three qubits, every circuit of at most min(s, 6) gates.
json encode(const AdversaryFamily& family);
AdversaryFamily family_from_descriptor(const std::string& descriptor, std::size_t side_dim);

json encode(const ExtractorSpec& spec);
ExtractorSpec decode_extractor(const json& j);

json encode(const GuessCertificate& cert);  // summary without matrices
json encode(const EntropyInterval& r);
json encode(const SmoothResult& r);        // summary without the candidate
json encode(const ChainRuleReport& r);
json encode(const LeakageValidation& r);
json encode(const DegradationReport& r);
json encode(const DesignCheck& r);
json encode(const IpExtractorReport& r);
json encode(const ComposedExtractorReport& r);
json encode(const ProtocolTranscript& t);
json encode(const MarkovCheck& r);
json encode(const ExtractionQuality& r);
json encode(const CumulativeDistance& r);

json encode(const ChannelSpec& spec);
ChannelSpec decode_channel_spec(const json& j);
// Accepts {"preset": name, ...overrides} or a full description.
ProtocolConfig decode_protocol_config(const json& j);
json encode(const ProtocolConfig& config);

// Per-round CSV with 12 significant digits.
std::string transcript_csv(const ProtocolTranscript& t);
std::string format_csv_number(double v);

}  // namespace unplab
