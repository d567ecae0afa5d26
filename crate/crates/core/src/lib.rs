pub mod building;
pub mod charclass;
pub mod exactlin;
pub mod fan;
pub mod io;
pub mod moduli;
pub mod onepar;
pub mod par;
pub mod plmap;
pub mod weyl;
