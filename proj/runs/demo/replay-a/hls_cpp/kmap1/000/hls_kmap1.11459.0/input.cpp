bool kmap1(bool a, bool b, bool c) {
#pragma HLS INTERFACE ap_ctrl_none port=return
    // minterms misread from the map
    return (a & !b) | (b & c);
}
