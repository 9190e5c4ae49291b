#pragma once

// JSON and CSV renderings of reports. Non-finite numbers become null;
// partition indices are written 1-based.

#include <iosfwd>

#include "json.hpp"

#include "gcs/certify.hpp"
#include "gcs/scaling.hpp"
#include "gcs/variational.hpp"

namespace gcs {

nlohmann::json json_number(double v);
nlohmann::json json_vector(const Vector& v);
nlohmann::json json_matrix(const Matrix& m);

nlohmann::json to_json(const Witness& w);
nlohmann::json to_json(const GcsCertificateReport& r);
nlohmann::json to_json(const SweReport& r);
nlohmann::json to_json(const EntrainmentReport& r);
nlohmann::json to_json(const GridSupResult& r);
nlohmann::json to_json(const PartitionReport& r);
nlohmann::json to_json(const ScalingResult& r);
nlohmann::json to_json(const NestedReport& r);
nlohmann::json to_json(const IcReport& r);
nlohmann::json to_json(const EquilibriumReport& r);
nlohmann::json to_json(const FinslerReport& r);

/// Per grid point: `x1..xn, c_1..c_n` (L1) or `d_1..d_n` (Linf), `mu`,
/// evaluated on the scaled Jacobian at time t.
void write_margin_table(std::ostream& out, const SystemModel& model, const NormKind& norm, const GridSpec& grid,
                        const Domain& region, double t = 0.0);

/// Certificate witness and summary as a one-row CSV.
void write_certificate_csv(std::ostream& out, const GcsCertificateReport& r);

}  // namespace gcs
