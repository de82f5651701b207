#pragma once

#include <nlohmann/json.hpp>

#include "mtbp/basins.hpp"
#include "mtbp/conjugate.hpp"
#include "mtbp/countable.hpp"
#include "mtbp/fixedpoint.hpp"
#include "mtbp/simulate.hpp"
#include "mtbp/spectral.hpp"

namespace mtbp {

// JSON views of the analysis records. Field order is fixed by construction
// (ordered maps), so serialized reports are stable byte-for-byte across runs.
using ordered_json = nlohmann::ordered_json;

ordered_json json_vec(const Eigen::VectorXd& v);
ordered_json json_mat(const Eigen::MatrixXd& m);

ordered_json report_json(const SpectralReport& r);
ordered_json report_json(const GfPosWitness& w);
ordered_json report_json(const GfBdedWitness& w);
ordered_json report_json(const ModelAnalysis& a);
ordered_json report_json(const BasinCertificate& c);
ordered_json report_json(const BasinVerdict& v);
ordered_json report_json(const FixedPoint& p);
ordered_json report_json(const FixedPointReport& r);
ordered_json report_json(const FixedPointCheck& c);
ordered_json report_json(const ConjugateModel& c);  // summary; the tilted model itself ships as a model file
ordered_json report_json(const TiltBackRecord& r);
ordered_json report_json(const ConditionedLawReport& r);
ordered_json report_json(const McExtinction& r);
ordered_json report_json(const TruncationRecord& r);
ordered_json report_json(const TruncationScan& s);
ordered_json report_json(const AssumptionsReport& r);

}  // namespace mtbp
