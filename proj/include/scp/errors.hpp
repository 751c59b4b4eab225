#pragma once

#include <stdexcept>
#include <string>

namespace scp {

// Error categories map to CLI exit codes: config problems exit 2, violations
// of the method's standing assumptions exit 3, numeric failures exit 4.
enum class ErrorCategory { config = 2, assumption = 3, numeric = 4 };

class ScpError : public std::runtime_error {
public:
    ScpError(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const { return category_; }

private:
    ErrorCategory category_;
};

#define SCP_DEFINE_ERROR(Name, Cat)                                   \
    class Name : public ScpError {                                    \
    public:                                                           \
        explicit Name(const std::string& msg)                         \
            : ScpError(ErrorCategory::Cat, std::string(#Name ": ") + msg) {} \
    }

// config / data ingestion
SCP_DEFINE_ERROR(ConfigError, config);
SCP_DEFINE_ERROR(SchemaError, config);
SCP_DEFINE_ERROR(EmptyFilterError, config);
SCP_DEFINE_ERROR(InvalidSpecError, config);

// standing-assumption violations
SCP_DEFINE_ERROR(SupportMismatchError, assumption);
SCP_DEFINE_ERROR(TruncationError, assumption);
SCP_DEFINE_ERROR(ShellStarvationError, assumption);
SCP_DEFINE_ERROR(NoDensityError, assumption);

// numeric failures
SCP_DEFINE_ERROR(MapEvaluationError, numeric);
SCP_DEFINE_ERROR(DegenerateJacobianError, numeric);
SCP_DEFINE_ERROR(EmptyContourError, numeric);
SCP_DEFINE_ERROR(ContourTraceError, numeric);
SCP_DEFINE_ERROR(QuadratureError, numeric);
SCP_DEFINE_ERROR(DegenerateRangeError, numeric);
SCP_DEFINE_ERROR(EmptyHistogramError, numeric);
SCP_DEFINE_ERROR(WeightDegeneracyError, numeric);
SCP_DEFINE_ERROR(PartitionMismatchError, numeric);

#undef SCP_DEFINE_ERROR

}  // namespace scp
