bool kmap1(bool a, bool b, bool c) {
#pragma HLS INTERFACE ap_ctrl_none port=return
    return !(a ^ c);
}
