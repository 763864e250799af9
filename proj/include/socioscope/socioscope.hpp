#pragma once

#include "socioscope/common.hpp"
#include "socioscope/csv.hpp"
#include "socioscope/directory.hpp"
#include "socioscope/graph.hpp"
#include "socioscope/ingest.hpp"
#include "socioscope/socio.hpp"
#include "socioscope/class_matrix.hpp"
#include "socioscope/spending.hpp"
#include "socioscope/nullmodel.hpp"
#include "socioscope/louvain.hpp"
#include "socioscope/kmeans.hpp"
#include "socioscope/catnet.hpp"
#include "socioscope/dynamics.hpp"
#include "socioscope/synth.hpp"
#include "socioscope/oracle.hpp"
#include "socioscope/pipeline.hpp"
