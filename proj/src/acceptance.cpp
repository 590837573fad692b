// Implemented incrementally.
namespace fermicurve {}
