void dec2_4(bool en, ap_uint<2> sel, ap_uint<4> *y) {
#pragma HLS INTERFACE ap_ctrl_none port=return
    *y = ap_uint<4>(1) << sel;
}
