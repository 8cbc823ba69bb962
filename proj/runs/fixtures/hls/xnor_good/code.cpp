bool xnor_gate(bool a, bool b) {
#pragma HLS INTERFACE ap_ctrl_none port=return
    return !(a ^ b);
}
