pub mod estimates;
pub mod mollify;
pub mod muckenhoupt;
pub mod ns_run;
pub mod pressure;
pub mod riesz;
