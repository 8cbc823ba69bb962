void fsm_next(bool state, bool go, bool done, bool *next_state, bool *busy) {
#pragma HLS INTERFACE ap_ctrl_none port=return
    *next_state = state ? !done : go;
    *busy = state;
}
