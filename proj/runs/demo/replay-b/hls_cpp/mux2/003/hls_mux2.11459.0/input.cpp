ap_uint<4> mux2(bool sel, ap_uint<4> a, ap_uint<4> b) {
#pragma HLS INTERFACE ap_ctrl_none port=return
    return sel ? b : a;
}
