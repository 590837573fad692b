#include <pybind11/pybind11.h>
PYBIND11_MODULE(_fermicurve, m) { m.doc() = "fermi curve library"; }
