#ifndef QFLOW_VERSION_HPP
#define QFLOW_VERSION_HPP

#define QFLOW_VERSION "0.1.0"

#endif  // QFLOW_VERSION_HPP
